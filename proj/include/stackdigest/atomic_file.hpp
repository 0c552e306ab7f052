#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace stackdigest {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view data);
std::string to_hex(std::span<const std::uint8_t> bytes);
/// Hex SHA-256 of a file's content; throws std::runtime_error when unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it over `path`, so readers
/// never observe a truncated file at the final location.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace stackdigest
