#ifndef QDLIE_QDLIE_HPP
#define QDLIE_QDLIE_HPP

#include "qdlie/classifier.hpp"
#include "qdlie/error.hpp"
#include "qdlie/flows.hpp"
#include "qdlie/lie_algebra.hpp"
#include "qdlie/lyapunov.hpp"
#include "qdlie/operators.hpp"
#include "qdlie/parallel.hpp"
#include "qdlie/point_index.hpp"
#include "qdlie/propagator.hpp"
#include "qdlie/random.hpp"
#include "qdlie/spectra.hpp"

#endif  // QDLIE_QDLIE_HPP
