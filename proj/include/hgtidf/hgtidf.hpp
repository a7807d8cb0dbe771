#pragma once

#include "hgtidf/corpus.hpp"
#include "hgtidf/error.hpp"
#include "hgtidf/evalx.hpp"
#include "hgtidf/ranking.hpp"
#include "hgtidf/scoring.hpp"
#include "hgtidf/surrogate.hpp"
#include "hgtidf/synthetic.hpp"
#include "hgtidf/termstats.hpp"
