#include "pcn/energy.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pcn/errors.hpp"

namespace pcn {

double total_energy(const ErrorBundle& bundle) {
    const std::size_t B = bundle.batch_size();
    if (B == 0) return 0.0;
    double sum = 0.0;
    for (const Matrix& e : bundle.errors) sum += squared_norm(e);
    if (bundle.sup_err) sum += squared_norm(*bundle.sup_err);
    return 0.5 * sum / static_cast<double>(B);
}

std::string_view to_string(Phase phase) {
    return phase == Phase::infer ? "infer" : "learn";
}

void EnergyTrace::record(std::size_t epoch, std::size_t batch_index, std::size_t step_index,
                         Phase phase, double energy) {
    if (!(energy >= 0.0) || !std::isfinite(energy))
        throw ContractError("energy record must be finite and nonnegative, got " +
                            std::to_string(energy));
    if (!records_.empty()) {
        const EnergyRecord& last = records_.back();
        const bool same_batch = last.epoch == epoch && last.batch_index == batch_index;
        if (same_batch) {
            if (step_index <= last.step_index)
                throw ContractError("energy trace: step " + std::to_string(step_index) +
                                    " does not follow step " +
                                    std::to_string(last.step_index) + " in epoch " +
                                    std::to_string(epoch) + " batch " +
                                    std::to_string(batch_index));
            if (last.phase == Phase::learn && phase == Phase::infer)
                throw ContractError("energy trace: infer record after learn records in epoch " +
                                    std::to_string(epoch) + " batch " +
                                    std::to_string(batch_index));
        } else if (epoch < last.epoch || (epoch == last.epoch && batch_index < last.batch_index)) {
            throw ContractError("energy trace: (epoch, batch) went backwards to (" +
                                std::to_string(epoch) + ", " + std::to_string(batch_index) +
                                ")");
        }
    }
    records_.push_back({epoch, batch_index, step_index, phase, energy});
}

void EnergyTrace::write_csv(std::ostream& out) const {
    out << "epoch,batch,step,phase,energy\n";
    char buf[64];
    for (const EnergyRecord& r : records_) {
        std::snprintf(buf, sizeof buf, "%.9g", r.energy);
        out << r.epoch << ',' << r.batch_index << ',' << r.step_index << ','
            << to_string(r.phase) << ',' << buf << '\n';
    }
}

}  // namespace pcn
