#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hh/certificates.hpp"
#include "hh/error.hpp"
#include "hh/parabolic.hpp"
#include "hh/params.hpp"
#include "hh/shooting.hpp"
#include "hh/variational.hpp"

namespace hh {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode : int { ExitOk = 0, ExitUsage = 1, ExitNumeric = 2, ExitConvergence = 3, ExitVerification = 4 };

int exit_code_for(ErrorCode code);

std::string sha256_hex(const std::string& bytes);
// Throws IoError when the file cannot be read.
std::string sha256_file(const std::string& path);
std::string utc_timestamp();

// HH_SEED when set to an unsigned integer, else fallback.
std::uint64_t seed_from_env(std::uint64_t fallback = 20240607);

// Every default control and tolerance, grouped by module.
nlohmann::json defaults_table();

struct Manifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0;
    int exit_code = 0;
};

// Digests every listed file; the only run-dependent values sit under "timestamp".
nlohmann::json manifest_json(const Manifest& m);
void write_manifest(const std::string& path, const Manifest& m);
std::string manifest_path_for(const std::string& artifact);

nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const ScalingFamilyCheck& c);
nlohmann::json to_json(const RandomSuiteResult& r);
nlohmann::json to_json(const TrackingReport& r);
nlohmann::json to_json(const StationarityOrder& o);

struct SolveOptions {
    RawParams raw;
    ShootingControls controls;
    std::optional<double> v0_lo;
    std::optional<double> v0_hi;
    std::string out;
};

struct MinimizeOptions {
    RawParams raw;
    MinimizerControls controls;
    std::string out;
    std::string report;
    std::size_t random_profiles = 1000;
};

struct VerifyOptions {
    std::string profile;
    std::string report;
    CertificateTolerances tolerances;
};

struct SimulateOptions {
    std::string profile;
    double horizon_s = 3;
    double delta = 0;
    std::string out;
    std::string report;
    ParabolicControls controls;
};

int run_solve(const SolveOptions& o, std::ostream& log);
int run_minimize(const MinimizeOptions& o, std::ostream& log);
int run_verify(const VerifyOptions& o, std::ostream& log);
int run_simulate(const SimulateOptions& o, std::ostream& log);

struct SweepSpec {
    std::vector<int> N;
    std::vector<double> m;
    std::vector<double> sigma;
    std::string out_dir;
    int jobs = 1;
    ShootingControls shooting;
    MinimizerControls minimizer;
    CertificateTolerances tolerances;
};

struct SweepRow {
    int N = 0;
    double m = 0;
    double sigma = 0;
    std::string status = "ok";
    double V0_star = 0;
    double R = 0;
    double V0_variational = 0;
    double V0_rel_diff = 0;
    double sup_distance_rel = 0;
    double K_star = 0;
    double S_min = 0;
    double S_rel_error = 0;
    double poh1 = 0;
    double poh2 = 0;
    double poh3 = 0;
    double ratio_rel_error = 0;
    std::string verdict;
    std::string detail;
};

// Cells run in a pool of spec.jobs workers; a failing cell is recorded in its row.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
SweepRow sweep_cell(int N, double m, double sigma, const SweepSpec& spec);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
int run_sweep_cli(const SweepSpec& spec, std::ostream& log);

// Sup over the shooting nodes of |v_var - v_shoot|, relative to the shooting V(0).
double profile_distance(const RadialProfile& shooting, const RadialProfile& variational);

}  // namespace hh
