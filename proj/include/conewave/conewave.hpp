#pragma once

#include "conewave/admissibility.hpp"
#include "conewave/cone.hpp"
#include "conewave/corpus.hpp"
#include "conewave/decay.hpp"
#include "conewave/diagnostics.hpp"
#include "conewave/error.hpp"
#include "conewave/fft.hpp"
#include "conewave/generator.hpp"
#include "conewave/grid.hpp"
#include "conewave/io.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sinc_integrals.hpp"
#include "conewave/transform.hpp"
#include "conewave/window.hpp"
