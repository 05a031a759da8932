#include "hh/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hh/error.hpp"

namespace hh {

std::string to_string(Regime regime) {
    return regime == Regime::Admissible ? "Admissible" : "NonexistenceProbe";
}

double unit_ball_volume(int N) {
    return std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

DerivedConstants derive(int N, double m, double sigma) {
    DerivedConstants c;
    const double n = N;
    c.theta = n * (m - 1) / (n * (m - 1) + 2 * (m + 1));
    c.mu = (m + 1) / m;
    c.omega = 2 * m / (m - 1);
    c.a_exp = 2 * (sigma + 2) / (n + sigma);
    c.b_exp = (n * (m - 1) - sigma * (m + 1)) / (m * (n + sigma));
    c.lambda_space_exp = 1 / (sigma + 2);
    c.lambda_amp_exp = 2 * m / ((m - 1) * (sigma + 2));
    c.touchdown_K = std::pow((m - 1) / (2 * m * (m + 1)), m / (m - 1));
    c.sphere_area = n * unit_ball_volume(N);
    c.s_dirichlet_exp = ((sigma + 2) * c.theta - sigma) / 2;
    c.s_lmu_exp = (sigma + 2) * (1 - c.theta) / c.mu;
    c.kappa_exp = m * (n + sigma) / (n * (m - 1) + 2 * (m + 1));

    const double m2 = m * m - 1;
    c.poh1[0] = -(n - 2) / 2;
    c.poh1[1] = -m * n / ((m + 1) * (m - 1));
    c.poh1[2] = (n + sigma) / 2;
    c.poh2[0] = 1;
    c.poh2[1] = 1 / (m - 1);
    c.poh2[2] = -1;
    c.poh3[0] = (sigma + 2) / 2;
    c.poh3[1] = (sigma * (m + 1) - n * (m - 1)) / (2 * m2);
    c.poh3[2] = 0;
    c.dl_ratio = (n * (m - 1) - sigma * (m + 1)) / (m2 * (sigma + 2));
    return c;
}

ProblemParams validate(const RawParams& raw, bool allow_probe) {
    auto bad = [](const std::string& what) { fail(ErrorCode::InvalidParameter, what); };
    if (raw.N < 1) bad("N >= 1 violated (N=" + std::to_string(raw.N) + ")");
    if (!std::isfinite(raw.m) || !(raw.m > 1)) bad("m > 1 violated");
    if (!std::isfinite(raw.sigma) || !(raw.sigma < 0)) bad("sigma < 0 violated");

    ProblemParams p;
    p.N = raw.N;
    p.m = raw.m;
    p.sigma = raw.sigma;
    const double lower = std::max(-2.0, -static_cast<double>(raw.N));
    if (raw.sigma > lower) {
        p.regime = Regime::Admissible;
    } else if (raw.sigma <= -2 && allow_probe) {
        p.regime = Regime::NonexistenceProbe;
    } else {
        std::ostringstream os;
        os << "sigma > max(-2, -N) = " << lower << " violated (sigma=" << raw.sigma << ")";
        if (raw.sigma <= -2) os << "; pass the nonexistence probe flag to certify sigma <= -2";
        bad(os.str());
    }
    p.c = derive(p.N, p.m, p.sigma);
    return p;
}

ProblemParams parse_config(const std::string& text) {
    RawParams raw;
    bool probe = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) fail(ErrorCode::InvalidParameter, "config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "N") {
                raw.N = std::stoi(val);
            } else if (key == "m") {
                raw.m = std::stod(val);
            } else if (key == "sigma") {
                raw.sigma = std::stod(val);
            } else if (key == "regime") {
                if (val == "NonexistenceProbe") {
                    probe = true;
                } else if (val != "Admissible") {
                    fail(ErrorCode::InvalidParameter, "unknown regime '" + val + "'");
                }
            } else {
                fail(ErrorCode::InvalidParameter, "unknown config key '" + key + "'");
            }
        } catch (const std::logic_error&) {
            fail(ErrorCode::InvalidParameter, "cannot parse value for '" + key + "': " + val);
        }
    }
    ProblemParams p = validate(raw, probe);
    if (probe && p.regime != Regime::NonexistenceProbe)
        fail(ErrorCode::InvalidParameter, "regime NonexistenceProbe requires sigma <= -2");
    return p;
}

ProblemParams load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace hh
