#pragma once

#include "animgram/batch.hpp"
#include "animgram/caption.hpp"
#include "animgram/catalog.hpp"
#include "animgram/constraint.hpp"
#include "animgram/defaults.hpp"
#include "animgram/dynamics.hpp"
#include "animgram/error.hpp"
#include "animgram/grammar.hpp"
#include "animgram/lexicon.hpp"
#include "animgram/motion.hpp"
#include "animgram/resampler.hpp"
#include "animgram/rng.hpp"
#include "animgram/scenario.hpp"
#include "animgram/scenario_io.hpp"
#include "animgram/scene.hpp"
#include "animgram/vec3.hpp"
