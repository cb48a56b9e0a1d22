#pragma once

#include "radiomap/io.hpp"

#include <string>
#include <vector>

namespace radiomap {

struct TheoryResult {
    std::string name;
    bool pass = false;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // one row per seed (or per N for consistency)
    io::json summary;
    // (tau, F(tau)) for the first instance where the check scans a curve.
    std::vector<std::pair<long, double>> curve;
};

// hardening, consistency, unimodality, flatness, monotonicity, cost_reduction,
// optimality, theorem1, matching
const std::vector<std::string>& theory_checks();

// params overrides the per-check defaults (seeds, beta, N, D, ...).
TheoryResult run_theory(const std::string& name, const io::json& params);

std::string theory_table_csv(const TheoryResult& r);

}  // namespace radiomap
