#ifndef ALC_ALC_HPP
#define ALC_ALC_HPP

/**
 * @file alc.hpp
 *
 * @brief Umbrella header for agglomerative likelihood clustering.
 */

#include "errors.hpp"
#include "correlation_matrix.hpp"
#include "partition.hpp"
#include "likelihood.hpp"
#include "engine.hpp"
#include "synthetic.hpp"
#include "io.hpp"
#include "evaluation.hpp"
#include "bootstrap.hpp"

namespace alc {

inline constexpr const char* version = "1.0.0";

}

#endif
