def gen_input(rng, max_len):
    n = rng.randint(1, max_len)
    ranks = [rng.randint(1, 10) for _ in range(n)]
    cars = rng.randint(1, max_len)
    return [ranks, cars]
