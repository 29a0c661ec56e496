#pragma once

#include <filesystem>
#include <string>

namespace semfed::testing {

std::filesystem::path fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);

}  // namespace semfed::testing
