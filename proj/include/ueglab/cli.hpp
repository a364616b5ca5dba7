#pragma once

#include <string>
#include <vector>

namespace ueg {

inline constexpr const char* kVersion = "0.1.0";

// Batch driver. Subcommands: indirect-energy, monge1d, gc-energy,
// thermo-cubes, lda-limit, floating-crystal, gs-kernel, lo-ratio,
// quantum-bounds. Every artifact embeds the resolved configuration and the
// library version; a fixed seed makes all outputs byte-identical across runs.
// Exit codes: 0 success, 2 constraint violation, 3 budget exhausted (partial
// results written when available), 64 usage errors.
int run_cli(const std::vector<std::string>& args);

} // namespace ueg
