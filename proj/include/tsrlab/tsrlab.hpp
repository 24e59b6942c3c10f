#pragma once

// Umbrella header.

#include "tsrlab/arch.hpp"
#include "tsrlab/checkpoint.hpp"
#include "tsrlab/errors.hpp"
#include "tsrlab/eval.hpp"
#include "tsrlab/grammar.hpp"
#include "tsrlab/nn.hpp"
#include "tsrlab/teds.hpp"
#include "tsrlab/tensor.hpp"
#include "tsrlab/token.hpp"
#include "tsrlab/toy.hpp"
#include "tsrlab/version.hpp"
