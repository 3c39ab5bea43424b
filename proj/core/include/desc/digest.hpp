#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace desc {

// 64-bit FNV-1a, rendered as 16 hex digits. Used to detect mismatched or
// edited ensemble member files, not as a cryptographic integrity check.
std::string fnv1a64_hex(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

}  // namespace desc
