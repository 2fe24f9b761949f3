#pragma once

namespace robscatter {

/// Which loop implementation a kernel should use. Both produce identical
/// results; Serial is the reference the tests compare against.
enum class Execution { Serial, Parallel };

/// Sets the OpenMP worker count (no-op without OpenMP). Values < 1 leave the
/// runtime default in place.
void set_threads(int threads);
int max_threads();

}  // namespace robscatter
