#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pcn/model.hpp"

namespace pcn {

// Batch-averaged energy: mean over samples of
// ½ Σ_l ‖ε_b^(l)‖² (+ ½ ‖ε_b^sup‖² in supervised mode).
double total_energy(const ErrorBundle& bundle);

enum class Phase { infer, learn };

std::string_view to_string(Phase phase);

struct EnergyRecord {
    std::size_t epoch = 0;
    std::size_t batch_index = 0;
    std::size_t step_index = 0;
    Phase phase = Phase::infer;
    double energy = 0.0;

    friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

// Append-only log of energy records. Within one (epoch, batch) the step
// index must strictly increase and the phase may only move infer → learn;
// (epoch, batch) keys must increase lexicographically.
class EnergyTrace {
public:
    void record(std::size_t epoch, std::size_t batch_index, std::size_t step_index,
                Phase phase, double energy);

    const std::vector<EnergyRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    // Header `epoch,batch,step,phase,energy`, energies to 9 significant digits.
    void write_csv(std::ostream& out) const;

private:
    std::vector<EnergyRecord> records_;
};

}  // namespace pcn
