#pragma once

// Long-range dependence toolkit: LRD tests, DFA, DCCA/DMCA coefficients,
// TAAFT surrogates, fGn synthesis and the financial data pipeline.

#include "lrdkit/date.hpp"
#include "lrdkit/dfa.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/finance.hpp"
#include "lrdkit/lrd_tests.hpp"
#include "lrdkit/parallel.hpp"
#include "lrdkit/series.hpp"
#include "lrdkit/surrogates.hpp"
#include "lrdkit/synth.hpp"
#include "lrdkit/xcorr.hpp"
