#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cctv {

// Throws error_kind::kIo ("no such file: ...") when the file is missing.
std::string read_file(std::filesystem::path const&);

// Creates parent directories as needed.
void write_file(std::filesystem::path const&, std::string_view content);

}  // namespace cctv
