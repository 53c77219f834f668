#pragma once

// Certification report carried by every algebra / engine check.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

// Outcome of one certification check. Residuals are operator norms unless the
// check documents otherwise; details holds one labeled residual per item
// inspected so a failure names the offending relation.
struct CertReport {
    std::string check;
    double residual_max = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> details;
};

inline CertReport make_report(std::string check, double tolerance,
                              std::vector<std::pair<std::string, double>> details) {
    CertReport r;
    r.check = std::move(check);
    r.tolerance = tolerance;
    r.details = std::move(details);
    r.residual_max = 0.0;
    for (const auto& [label, res] : r.details) r.residual_max = std::max(r.residual_max, res);
    r.pass = r.residual_max <= tolerance;
    return r;
}

}  // namespace qwalk
