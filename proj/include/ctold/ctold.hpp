#pragma once

#include "ctold/tensor.hpp"
#include "ctold/ops.hpp"
#include "ctold/init.hpp"
#include "ctold/adam.hpp"
#include "ctold/preprocess.hpp"
#include "ctold/corpus.hpp"
#include "ctold/graph.hpp"
#include "ctold/layers.hpp"
#include "ctold/gat.hpp"
#include "ctold/encoder.hpp"
#include "ctold/fusion.hpp"
#include "ctold/model.hpp"
#include "ctold/metrics.hpp"
#include "ctold/config.hpp"
#include "ctold/synthetic.hpp"
#include "ctold/train.hpp"
#include "ctold/checkpoint.hpp"
