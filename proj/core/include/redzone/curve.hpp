#pragma once

#include <optional>
#include <vector>

namespace redzone {

// One sample of a system failure-rate curve (weeks, failures/week).
struct CurvePoint {
    double t;
    double value;
};

using Curve = std::vector<CurvePoint>;

// Interval of critically elevated system failure rate.
struct RedZone {
    double start;
    double end;
    double severity;  // max h / baseline inside the interval
    double baseline;
};

// Detection settings. Missing values fall back to model defaults: baseline
// lambda_u, scan window [Th1 + Th2, end of curve].
struct RedZoneOptions {
    double k = 2.0;
    std::optional<double> baseline;
    std::optional<double> scan_start;
    std::optional<double> scan_end;
};

}  // namespace redzone
