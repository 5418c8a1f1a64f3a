#pragma once

#include "tgml/nn/activation.hpp"
#include "tgml/nn/metrics.hpp"
#include "tgml/nn/model_io.hpp"
#include "tgml/nn/network.hpp"
#include "tgml/nn/normalization.hpp"
#include "tgml/nn/optimizer.hpp"
#include "tgml/nn/train.hpp"
