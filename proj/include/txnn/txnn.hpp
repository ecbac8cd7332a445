#pragma once

// Umbrella header: pulls in the whole library.

#include "txnn/activations.hpp"
#include "txnn/bench.hpp"
#include "txnn/checkpoint.hpp"
#include "txnn/csv.hpp"
#include "txnn/dataset.hpp"
#include "txnn/errors.hpp"
#include "txnn/gradcheck.hpp"
#include "txnn/idx.hpp"
#include "txnn/layers.hpp"
#include "txnn/loss.hpp"
#include "txnn/matrix.hpp"
#include "txnn/model.hpp"
#include "txnn/optimizer.hpp"
#include "txnn/rng.hpp"
#include "txnn/train.hpp"
