#pragma once

namespace ishear {

// Every data-parallel kernel has a plain serial loop (the reference used by
// tests) and an OpenMP loop. Both produce bit-identical results.
enum class Exec { serial, parallel };

inline Exec default_exec() { return Exec::parallel; }

}  // namespace ishear
