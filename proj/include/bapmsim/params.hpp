#pragma once

#include "bapmsim/iomodel.hpp"
#include "bapmsim/memmodel.hpp"

namespace bapmsim {

/// All storage/memory model constants the engine consumes. The parallel-FS
/// constants live on the ClusterSpec; everything else is here.
struct ModelParams {
    mem::MemoryParams memory;
    io::FsdaxParams fsdax;
    io::EphemeralFsParams ephemeral;
    io::ObjectStoreParams objstore;
};

} // namespace bapmsim
