#pragma once

#include "hsfuse/cube.hpp"
#include "hsfuse/degradation.hpp"
#include "hsfuse/error.hpp"
#include "hsfuse/fft.hpp"
#include "hsfuse/gradient.hpp"
#include "hsfuse/hqs.hpp"
#include "hsfuse/io.hpp"
#include "hsfuse/metrics.hpp"
#include "hsfuse/parallel.hpp"
#include "hsfuse/priors.hpp"
#include "hsfuse/sylvester.hpp"
#include "hsfuse/synth.hpp"
#include "hsfuse/vstep.hpp"
