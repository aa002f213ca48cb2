// Copyright 2026 The descjudge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace descjudge {

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// Round-half-even at `digits` decimal places. Internal math stays full
/// precision; this is applied only when values are presented.
inline double round_half_even(double value, int digits) {
    if (!std::isfinite(value)) return value;
    double scale = std::pow(10.0, digits);
    double scaled = value * scale;
    double floor_v = std::floor(scaled);
    double frac = scaled - floor_v;
    // Tolerance absorbs binary representation error around exact .5 ties.
    const double eps = 1e-9;
    double rounded;
    if (frac > 0.5 + eps) {
        rounded = floor_v + 1.0;
    } else if (frac < 0.5 - eps) {
        rounded = floor_v;
    } else {
        rounded = (std::fmod(floor_v, 2.0) == 0.0) ? floor_v : floor_v + 1.0;
    }
    return rounded / scale;
}

/// Fixed-decimal formatting of an already half-even-rounded value.
inline std::string format_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, round_half_even(value, digits));
    return buf;
}

/// Presentation form for scores: 3 decimals, round-half-even.
inline std::string format_score(double value) { return format_fixed(value, 3); }

/// Presentation form for percentages: fraction*100, 2 decimals, round-half-even.
inline std::string format_percent(double fraction) { return format_fixed(fraction * 100.0, 2); }

} // namespace descjudge
