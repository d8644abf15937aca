// selftest.hpp - invariant suite run by `photon_smatrix selftest`.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace psm::app {

struct PropertyResult {
    std::string name;
    double max_deviation = 0;
    double tolerance = 0;
    bool passed = false;
};

struct SelftestReport {
    std::vector<PropertyResult> properties;

    bool passed() const;
    void print(std::ostream& os) const;
};

struct SelftestOptions {
    std::uint64_t seed = 20240607;
    // Testing hook: added to the simplified-path value before comparison.
    double perturbation = 0;
};

SelftestReport run_selftest(const SelftestOptions& opts = {});

}  // namespace psm::app
