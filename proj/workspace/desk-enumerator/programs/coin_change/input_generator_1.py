def gen_input(rng, max_len):
    k = rng.randint(2, 4)
    coins = rng.sample(range(2, max_len + 1), k)
    amount = rng.randint(1, 3 * max_len)
    return [coins, amount]
