#pragma once

// Umbrella header for the infobound library: Fisher information, mutual
// information, and minimax lower bounds for samples observed through
// information-constrained channels.

#include "infobound/bounds.hpp"
#include "infobound/channels.hpp"
#include "infobound/cli.hpp"
#include "infobound/common.hpp"
#include "infobound/distributed.hpp"
#include "infobound/fisher.hpp"
#include "infobound/info.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"
#include "infobound/serialize.hpp"
