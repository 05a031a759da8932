#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "hh/radial_field.hpp"

namespace hh {

struct ProfileHeader {
    int N = 3;
    double m = 2;
    double sigma = -1;
    double V0 = 0;
    std::optional<double> R;
    // Further "# key=value" lines.
    std::map<std::string, double> extras;
};

struct ProfileFile {
    ProfileHeader header;
    RadialProfile profile;
};

// Rows r,V,Vprime at 17 significant digits; Vprime is nan when derivatives are absent.
void write_profile_csv(std::ostream& out, const ProfileHeader& header, const RadialProfile& p);
void write_profile_csv(const std::string& path, const ProfileHeader& header, const RadialProfile& p);

ProfileFile read_profile_csv(std::istream& in);
ProfileFile read_profile_csv(const std::string& path);

ProblemParams params_from_header(const ProfileHeader& h);

}  // namespace hh
