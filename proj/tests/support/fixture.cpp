#include "support/fixture.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace semfed::testing {

std::filesystem::path fixture_path(const std::string& relative) {
  return std::filesystem::path(SEMFED_FIXTURE_DIR) / relative;
}

std::string read_fixture(const std::string& relative) {
  std::ifstream in(fixture_path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + relative);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace semfed::testing
