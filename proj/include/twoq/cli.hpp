#pragma once

#include "twoq/report.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twoq::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes; each error family gets a distinct value.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kParse = 3,
    kAnnihilated = 4,
    kAssertionFailure = 5,
    kIo = 6,
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string circuit_path;
    std::size_t shots = 1000;
    std::uint64_t seed = 1;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t samples = 128;
    bool inject_identity = false;
};

struct OptimizeOptionsCli {
    std::string mode = "1wqc"; // or "2wqc"
    std::size_t budget = 50000;
    std::size_t restarts = 8;
    std::uint64_t seed = 1;
    std::size_t depth = 2;
};

struct Bb84OptionsCli {
    std::size_t pulses = 10000;
    std::string eve = "none"; // none | intercept-resend | postselect-clone
    std::uint64_t seed = 1;
    double sample_fraction = 0.5;
};

Report cmd_run(const RunOptions& opts);
Report cmd_noclone_verify(const VerifyOptions& opts);
Report cmd_noclone_optimize(const OptimizeOptionsCli& opts);
Report cmd_bb84(const Bb84OptionsCli& opts);

/// True when a verification-style report holds (used to pick the exit code).
bool report_passes(const Report& report);

} // namespace twoq::cli
