#pragma once

namespace invsrc {

// Batch kernels run OpenMP-parallel by default; the serial path is kept as
// the reference implementation for tests (results are bit-identical because
// every output slot is computed independently with a fixed reduction order).
enum class ExecPolicy { serial, parallel };

} // namespace invsrc
