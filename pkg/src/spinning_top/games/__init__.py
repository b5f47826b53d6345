from spinning_top.games.extensive import (
    ConnectFour,
    ExtensiveGame,
    Misere,
    ParityGame,
    TicTacToe,
    TreeGame,
    connect_four,
    misere,
    one_step_rps_tree,
    parity_game,
    three_step_fixture,
    tictactoe,
)
from spinning_top.games.normal_form import (
    LayeredSpec,
    NormalFormGame,
    RandomGoSSpec,
    blotto,
    disc_game,
    elo_game,
    is_antisymmetric,
    is_monotonic,
    layered_game,
    noisy_elo_game,
    random_game_of_skill,
    rps,
    standardize,
)

EXTENSIVE_GAMES = {
    "tictactoe": tictactoe,
    "misere": lambda: misere(tictactoe()),
    "connect_four": connect_four,
    "three_step": three_step_fixture,
    "one_step": one_step_rps_tree,
}

__all__ = [
    "blotto",
    "connect_four",
    "ConnectFour",
    "disc_game",
    "elo_game",
    "EXTENSIVE_GAMES",
    "ExtensiveGame",
    "is_antisymmetric",
    "is_monotonic",
    "layered_game",
    "LayeredSpec",
    "misere",
    "Misere",
    "noisy_elo_game",
    "NormalFormGame",
    "one_step_rps_tree",
    "parity_game",
    "ParityGame",
    "random_game_of_skill",
    "RandomGoSSpec",
    "rps",
    "standardize",
    "three_step_fixture",
    "TicTacToe",
    "tictactoe",
    "TreeGame",
]
