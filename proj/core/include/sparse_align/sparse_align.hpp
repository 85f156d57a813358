#pragma once

// Umbrella header.
#include "sparse_align/constraint_spec.hpp"
#include "sparse_align/constraints.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/exact.hpp"
#include "sparse_align/matrix.hpp"
#include "sparse_align/metrics.hpp"
#include "sparse_align/ot_core.hpp"
#include "sparse_align/random.hpp"
#include "sparse_align/rationale.hpp"
#include "sparse_align/serialization.hpp"
#include "sparse_align/sinkhorn.hpp"
#include "sparse_align/textio.hpp"
