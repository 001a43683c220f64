#pragma once

#include "metrodiff/fixman.hpp"
#include "metrodiff/linalg.hpp"
#include "metrodiff/metropolis.hpp"
#include "metrodiff/model.hpp"
#include "metrodiff/models/chain1d.hpp"
#include "metrodiff/models/double_well.hpp"
#include "metrodiff/models/heavy_tail.hpp"
#include "metrodiff/models/reference.hpp"
#include "metrodiff/models/rpy_chain.hpp"
#include "metrodiff/models/tilted_well.hpp"
#include "metrodiff/observables.hpp"
#include "metrodiff/parallel.hpp"
#include "metrodiff/random.hpp"
#include "metrodiff/stages.hpp"
#include "metrodiff/verify.hpp"
