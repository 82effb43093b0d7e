#pragma once

#include "psmaudit/bpe.hpp"
#include "psmaudit/corpus.hpp"
#include "psmaudit/error.hpp"
#include "psmaudit/mia.hpp"
#include "psmaudit/model.hpp"
#include "psmaudit/parallel.hpp"
#include "psmaudit/patterns.hpp"
#include "psmaudit/report.hpp"
#include "psmaudit/rng.hpp"
#include "psmaudit/steal.hpp"
#include "psmaudit/strength.hpp"
#include "psmaudit/targeted.hpp"
