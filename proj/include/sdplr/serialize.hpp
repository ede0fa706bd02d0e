#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "sdplr/alm.hpp"

namespace sdplr {

using json = nlohmann::json;

/// NaN is not representable in JSON; absent metrics become null.
inline json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline json to_json(const IterationRecord& rec) {
    return json{{"t", rec.t},
                {"rank", rec.rank},
                {"sigma", rec.sigma},
                {"eta_tol", rec.eta_tol},
                {"omega_tol", rec.omega_tol},
                {"eta", rec.eta},
                {"omega", rec.omega},
                {"xi", finite_or_null(rec.xi)},
                {"inner_iterations", rec.inner_iterations},
                {"wall_seconds", rec.wall_seconds},
                {"dual_updated", rec.dual_updated},
                {"sigma_doubled", rec.sigma_doubled},
                {"rank_doubled", rec.rank_doubled},
                {"regenerated", rec.regenerated}};
}

inline json to_json(const SolveResult& res) {
    return json{{"objective", res.objective},
                {"objective_canonical", res.objective_canonical},
                {"eta", res.eta},
                {"omega", res.omega},
                {"xi", finite_or_null(res.xi)},
                {"lambda_min", res.lambda_min},
                {"dual_value", res.dual_value},
                {"subopt_bound", res.subopt_bound},
                {"status", to_string(res.status)},
                {"outer_iterations", res.outer_iterations},
                {"final_rank", res.final_rank},
                {"wall_seconds", res.wall_seconds}};
}

}  // namespace sdplr
