#pragma once

#include "qic/bounds.hpp"
#include "qic/channels.hpp"
#include "qic/core.hpp"
#include "qic/entropy.hpp"
#include "qic/games.hpp"
#include "qic/parallel.hpp"
#include "qic/propcheck.hpp"
#include "qic/protocols.hpp"
#include "qic/rng.hpp"
