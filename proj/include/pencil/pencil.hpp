#pragma once

#include "pencil/algebra.hpp"
#include "pencil/canonical.hpp"
#include "pencil/construction.hpp"
#include "pencil/falsify.hpp"
#include "pencil/feasibility.hpp"
#include "pencil/json_io.hpp"
#include "pencil/linalg.hpp"
#include "pencil/rng.hpp"
#include "pencil/synth.hpp"
#include "pencil/types.hpp"
