#pragma once

#include "signspot/decoder.hpp"
#include "signspot/dictionary.hpp"
#include "signspot/error.hpp"
#include "signspot/eval.hpp"
#include "signspot/feature.hpp"
#include "signspot/fusion.hpp"
#include "signspot/io.hpp"
#include "signspot/lm.hpp"
#include "signspot/pipeline.hpp"
#include "signspot/remote_lm.hpp"
#include "signspot/rng.hpp"
#include "signspot/similarity.hpp"
#include "signspot/synth.hpp"
