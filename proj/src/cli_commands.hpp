#pragma once

#include <string>
#include <vector>

#include "liquiforge/core/error.hpp"

namespace liquiforge::cli {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int report_error(const Error& e);
int run_demo_command(const std::string& name, const std::vector<std::string>& overrides, const std::string& out);
int run_study_command(const std::string& name, const std::string& config_file, unsigned threads, const std::string& out);

} // namespace liquiforge::cli
