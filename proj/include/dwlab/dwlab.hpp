#pragma once

// Umbrella header for the library (the CLI layer lives in dwlab/cli.hpp).

#include <dwlab/classify.hpp>
#include <dwlab/config.hpp>
#include <dwlab/errors.hpp>
#include <dwlab/grammar.hpp>
#include <dwlab/holomap.hpp>
#include <dwlab/hypgeom.hpp>
#include <dwlab/io.hpp>
#include <dwlab/random.hpp>
#include <dwlab/sequence.hpp>
#include <dwlab/verify.hpp>
