#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecoplex {

// Effective settings of one CLI invocation. Fully serializable: every
// command emits its config next to its outputs, and re-running from that
// file reproduces the outputs byte for byte.
struct RunConfig {
    std::string command;
    std::string input;
    std::string out = "out";
    int year = 1990;
    double rca_threshold = 1.0;
    std::string prune_policy = "component";  // component | strict
    std::string route = "svd";               // svd | eigen | mor
    double tol = 1e-12;
    int max_iter = 10000;
    int iters = 20;  // method-of-reflections iterations
    std::uint64_t seed = 1;
    bool verify = false;
    bool audit = false;
    std::string target;        // greedy target country
    std::string candidates;    // sweep candidate CSV (country,product)
    std::string country;       // sweep: one country's absent products
    std::string product_set;   // sweep filter: a-core | b-core | borderline
    double high_threshold = 0.997;
    double borderline_threshold = 0.6;
    int greedy_max_iter = 200;
};

// Exit codes: 0 success, 1 computation failure, 2 usage or I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecoplex
