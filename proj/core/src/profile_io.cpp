#include "hh/profile_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hh/error.hpp"

namespace hh {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_num(const std::string& s) {
    const char* b = s.c_str();
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (e == b) fail(ErrorCode::IoError, "bad number '" + s + "'");
    return v;
}

}  // namespace

void write_profile_csv(std::ostream& out, const ProfileHeader& h, const RadialProfile& p) {
    out << "# N=" << h.N << " m=" << num(h.m) << " sigma=" << num(h.sigma) << " V0=" << num(h.V0)
        << " R=" << (h.R ? num(*h.R) : std::string("inf")) << '\n';
    for (const auto& [k, v] : h.extras) out << "# " << k << '=' << num(v) << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p.derivs ? (*p.derivs)[i] : std::nan("");
        out << num(p.r(i)) << ',' << num(p.values[i]) << ',' << num(d) << '\n';
    }
}

void write_profile_csv(const std::string& path, const ProfileHeader& h, const RadialProfile& p) {
    std::ofstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot write " + path);
    write_profile_csv(f, h, p);
}

ProfileFile read_profile_csv(std::istream& in) {
    ProfileFile pf;
    bool have_main = false;
    std::vector<double> r, v, d;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            std::map<std::string, std::string> kv;
            while (ss >> tok) {
                auto eq = tok.find('=');
                if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            if (kv.count("N") && kv.count("m") && kv.count("sigma")) {
                pf.header.N = static_cast<int>(parse_num(kv["N"]));
                pf.header.m = parse_num(kv["m"]);
                pf.header.sigma = parse_num(kv["sigma"]);
                if (kv.count("V0")) pf.header.V0 = parse_num(kv["V0"]);
                if (kv.count("R")) {
                    const double R = parse_num(kv["R"]);
                    if (std::isfinite(R)) pf.header.R = R;
                }
                have_main = true;
            } else {
                for (const auto& [k, val] : kv) pf.header.extras[k] = parse_num(val);
            }
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '+' && line[0] != '.')
            continue;  // column header
        std::istringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        r.push_back(parse_num(a));
        v.push_back(parse_num(b));
        d.push_back(c.empty() ? std::nan("") : parse_num(c));
    }
    if (!have_main) fail(ErrorCode::IoError, "profile header '# N=.. m=.. sigma=..' missing");
    if (r.size() < 2) fail(ErrorCode::IoError, "profile has fewer than two rows");
    bool any_deriv = false;
    for (double x : d)
        if (!std::isnan(x)) any_deriv = true;
    for (double& x : v)
        if (x < 0 && x > -1e-300) x = 0;
    pf.profile = make_profile(RadialGrid::from_nodes(std::move(r)), std::move(v),
                              any_deriv ? std::optional<std::vector<double>>(std::move(d)) : std::nullopt,
                              pf.header.R);
    return pf;
}

ProfileFile read_profile_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot open " + path);
    return read_profile_csv(f);
}

ProblemParams params_from_header(const ProfileHeader& h) {
    return validate(RawParams{h.N, h.m, h.sigma}, true);
}

}  // namespace hh
