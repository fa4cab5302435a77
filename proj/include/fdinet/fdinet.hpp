#pragma once

#include "fdinet/netcore.hpp"
#include "fdinet/measures.hpp"
#include "fdinet/econ/critical_distance.hpp"
#include "fdinet/econ/heckman.hpp"
#include "fdinet/econ/ols.hpp"
#include "fdinet/econ/ppml.hpp"
#include "fdinet/econ/probit.hpp"
#include "fdinet/econ/report.hpp"
#include "fdinet/econ/sem.hpp"
#include "fdinet/econ/stats.hpp"
#include "fdinet/econ/zippml.hpp"
#include "fdinet/synth/generate.hpp"
#include "fdinet/synth/oracles.hpp"
#include "fdinet/synth/rng.hpp"
