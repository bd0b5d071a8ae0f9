#pragma once

// Umbrella header for the hsi denoising toolkit.

#include "hsi/cube.hpp"
#include "hsi/error.hpp"
#include "hsi/harness.hpp"
#include "hsi/losses.hpp"
#include "hsi/metrics.hpp"
#include "hsi/nn/adam.hpp"
#include "hsi/nn/skip_net.hpp"
#include "hsi/noise.hpp"
#include "hsi/render.hpp"
#include "hsi/rng.hpp"
#include "hsi/sigma.hpp"
#include "hsi/synthetic.hpp"
#include "hsi/trainer.hpp"
