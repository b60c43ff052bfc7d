#include "mobman/io.hpp"

#include "mobman/error.hpp"

#include <fstream>
#include <sstream>

namespace mobman {

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoError, "cannot write " + path);
  f << contents;
  if (!f.flush()) fail(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace mobman
