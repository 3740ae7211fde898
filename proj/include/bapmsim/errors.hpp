#pragma once

#include <stdexcept>
#include <string>

namespace bapmsim {

enum class Err {
    InvalidSpec,
    OverCommit,
    OutOfMemory,
    AllocationConflict,
    CyclicWorkflow,
    InsufficientCapacity,
    Unidentifiable,
    NoConvergence,
    PatternRequired,
    BadInput,
};

const char* to_string(Err e);

/// Typed runtime error carrying the model-level failure kind.
class SimError : public std::runtime_error {
public:
    SimError(Err kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    Err kind() const { return kind_; }

private:
    Err kind_;
};

inline const char* to_string(Err e) {
    switch (e) {
        case Err::InvalidSpec: return "InvalidSpec";
        case Err::OverCommit: return "OverCommit";
        case Err::OutOfMemory: return "OutOfMemory";
        case Err::AllocationConflict: return "AllocationConflict";
        case Err::CyclicWorkflow: return "CyclicWorkflow";
        case Err::InsufficientCapacity: return "InsufficientCapacity";
        case Err::Unidentifiable: return "Unidentifiable";
        case Err::NoConvergence: return "NoConvergence";
        case Err::PatternRequired: return "PatternRequired";
        case Err::BadInput: return "BadInput";
    }
    return "UnknownError";
}

} // namespace bapmsim
