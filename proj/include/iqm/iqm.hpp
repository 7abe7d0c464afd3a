#pragma once

#include "iqm/errors.hpp"
#include "iqm/image.hpp"
#include "iqm/image_io.hpp"
#include "iqm/metrics.hpp"
#include "iqm/omega.hpp"
#include "iqm/report.hpp"
#include "iqm/sharpness.hpp"
#include "iqm/stats.hpp"
#include "iqm/synth.hpp"
