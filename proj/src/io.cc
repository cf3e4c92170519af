#include "cctv/io.h"

#include <fstream>
#include <sstream>

#include "cctv/error.h"

namespace cctv {

std::string read_file(std::filesystem::path const& p) {
  auto ec = std::error_code{};
  if (!std::filesystem::is_regular_file(p, ec)) {
    throw error{error_kind::kIo, "no such file: " + p.string()};
  }
  auto in = std::ifstream{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::kIo, "cannot open: " + p.string()};
  }
  auto ss = std::stringstream{};
  ss << in.rdbuf();
  return ss.str();
}

void write_file(std::filesystem::path const& p, std::string_view const content) {
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  auto out = std::ofstream{p, std::ios::binary | std::ios::trunc};
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw error{error_kind::kIo, "cannot write: " + p.string()};
  }
}

}  // namespace cctv
