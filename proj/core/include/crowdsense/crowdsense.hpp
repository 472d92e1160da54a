#pragma once

#include "crowdsense/consensus.hpp"
#include "crowdsense/copula.hpp"
#include "crowdsense/errors.hpp"
#include "crowdsense/io.hpp"
#include "crowdsense/kernel.hpp"
#include "crowdsense/lowrank.hpp"
#include "crowdsense/matrix.hpp"
#include "crowdsense/random.hpp"
#include "crowdsense/scenario.hpp"
