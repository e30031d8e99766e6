#pragma once

namespace potts {

/// Selects between the OpenMP kernels and their serial reference loops.
/// Both produce bit-identical results; `serial` exists for testing and
/// benchmarking.
enum class Execution { serial, parallel };

}  // namespace potts
