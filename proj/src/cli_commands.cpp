#include "cli_commands.hpp"

#include <cstdlib>
#include <iostream>

#include "liquiforge/liquiforge.hpp"

namespace liquiforge::cli {

int report_error(const Error& e) {
    std::cerr << "liquiforge: " << e.what() << "\n";
    const auto c = e.code();
    return c == ErrorCode::ConfigInvalid || c == ErrorCode::UnknownDemo ? kExitConfig : kExitRuntime;
}

namespace {

Overrides parse_overrides(const std::vector<std::string>& items) {
    Overrides out;
    for (const auto& kv : items) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorCode::ConfigInvalid, "/override: expected key=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

} // namespace

int run_demo_command(const std::string& name, const std::vector<std::string>& overrides, const std::string& out) {
    using namespace liquiforge;
    const auto result = run_demo(name, parse_overrides(overrides));
    std::cout << to_text(result.table);
    if (!out.empty()) {
        ReportWriter writer(out, {ReportFormat::CSV, ReportFormat::JSON});
        writer.write(result.table);
        writer.finish();
    }
    return result.passed() ? kExitPass : kExitAssertion;
}

int run_study_command(const std::string& name, const std::string& config_file, unsigned threads, const std::string& out) {
    using namespace liquiforge;
    auto j = read_config_json(config_file);
    if (const char* seed = std::getenv("LIQUIFORGE_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(seed, &end, 10);
        if (!*seed || *end) fail(ErrorCode::ConfigInvalid, "LIQUIFORGE_SEED: '" + std::string(seed) + "' is not an integer");
        j["seed"] = v;
    }
    auto config = parse_run_config(j);
    if (threads > 0) config.threads = threads;
    const std::string dir = out.empty() ? config.output_dir : out;
    const auto result = run_study(name, config, dir);
    for (const auto& e : result.manifest.entries) std::cout << e.file << "  rows=" << e.rows << "  crc32=" << e.checksum << "\n";
    std::cout << "manifest: " << dir << "/manifest.json\n";
    if (result.passed()) return kExitPass;
    std::cerr << "ASSERTION_FAILED: " << result.failures.size() << " failing row(s)\n";
    for (const auto& f : result.failures) std::cerr << "  " << f << "\n";
    return kExitAssertion;
}


} // namespace liquiforge::cli
