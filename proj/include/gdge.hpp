#pragma once

#include "gdge/bgdge.hpp"
#include "gdge/core_dge.hpp"
#include "gdge/dataset.hpp"
#include "gdge/em.hpp"
#include "gdge/errors.hpp"
#include "gdge/infer.hpp"
#include "gdge/io.hpp"
#include "gdge/numeric.hpp"
#include "gdge/profile.hpp"
#include "gdge/random.hpp"
#include "gdge/report.hpp"
#include "gdge/simulation.hpp"
#include "gdge/table.hpp"
#include "gdge/ugdge.hpp"
