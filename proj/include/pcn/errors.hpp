#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pcn {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not fit the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A precondition on a scalar argument or configuration value failed.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Supervised-only quantity requested from an unsupervised snapshot.
class ModeError : public Error {
public:
    using Error::Error;
};

// Caller broke an ordering or usage contract (e.g. energy trace ordering).
class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Dataset file whose size does not fit the record layout.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t expected, std::size_t actual)
        : Error(what), expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

// Record with an out-of-range label byte.
class CorruptRecordError : public Error {
public:
    CorruptRecordError(const std::string& what, std::size_t record_index)
        : Error(what), record_index_(record_index) {}

    std::size_t record_index() const noexcept { return record_index_; }

private:
    std::size_t record_index_;
};

// A latent or weight update produced NaN/Inf.
//
// `phase` is "infer" or "learn"; `layer` names the offending matrix
// ("x1".."xL" for latents, "W0".."W{L-1}" or "Wout" for weights).
// epoch/batch are filled in by the trainer when known.
class DivergenceError : public Error {
public:
    static constexpr std::size_t kUnknown = static_cast<std::size_t>(-1);

    DivergenceError(std::string phase, std::size_t step, std::string layer,
                    std::size_t epoch = kUnknown, std::size_t batch = kUnknown);

    const std::string& phase() const noexcept { return phase_; }
    std::size_t step() const noexcept { return step_; }
    const std::string& layer() const noexcept { return layer_; }
    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }

    DivergenceError with_location(std::size_t epoch, std::size_t batch) const {
        return DivergenceError(phase_, step_, layer_, epoch, batch);
    }

private:
    static std::string describe(const std::string& phase, std::size_t step,
                                const std::string& layer, std::size_t epoch,
                                std::size_t batch);

    std::string phase_;
    std::size_t step_;
    std::string layer_;
    std::size_t epoch_;
    std::size_t batch_;
};

inline DivergenceError::DivergenceError(std::string phase, std::size_t step,
                                        std::string layer, std::size_t epoch,
                                        std::size_t batch)
    : Error(describe(phase, step, layer, epoch, batch)),
      phase_(std::move(phase)),
      step_(step),
      layer_(std::move(layer)),
      epoch_(epoch),
      batch_(batch) {}

inline std::string DivergenceError::describe(const std::string& phase,
                                             std::size_t step,
                                             const std::string& layer,
                                             std::size_t epoch,
                                             std::size_t batch) {
    std::string msg = "numeric divergence: non-finite values in " + layer +
                      " (phase=" + phase + " step=" + std::to_string(step);
    if (epoch != kUnknown) msg += " epoch=" + std::to_string(epoch);
    if (batch != kUnknown) msg += " batch=" + std::to_string(batch);
    return msg + ")";
}

// Checkpoint decoding failures. Each subclass is a distinct failure mode.
class CheckpointError : public Error {
public:
    using Error::Error;
};

class BadMagicError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class VersionMismatchError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class TruncatedCheckpointError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class ShapeContradictionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

}  // namespace pcn
