"""Published reference values the model must reproduce.

INLET_PRESSURE_PA: P(0, t) in Pa for each total withdrawal level placed at
the 12 km tap of the reference ring.  GRADIENT_PA_PER_M: base-field dP/dx
in Pa/m on a 1000 m grid at two times; the 12000 m row is the regularized
zero at the withdrawal position.
"""

INLET_PRESSURE_PA = {
    11.0: {0: 125000, 50: 123462, 100: 120821, 150: 118129,
           200: 115436, 250: 112742, 300: 110049},
    12.0: {0: 125000, 50: 123323, 100: 120441, 150: 117505,
           200: 114566, 250: 111628, 300: 108690},
    13.0: {0: 125000, 50: 123183, 100: 120061, 150: 116880,
           200: 113697, 250: 110514, 300: 107330},
    14.0: {0: 125000, 50: 123043, 100: 119681, 150: 116255,
           200: 112827, 250: 109399, 300: 105971},
}

GRADIENT_PA_PER_M = {
    100.0: {
        0: 1.6334, 1000: 1.4809, 2000: 1.3258, 3000: 1.1746,
        4000: 1.0292, 5000: 0.8898, 6000: 0.7554, 7000: 0.6265,
        8000: 0.5035, 9000: 0.3857, 10000: 0.2733, 11000: 0.1666,
        12000: 0.0, 13000: -0.0306, 14000: -0.1208, 15000: -0.2056,
        16000: -0.285, 17000: -0.3588, 18000: -0.4271, 19000: -0.4901,
        20000: -0.5475, 21000: -0.5994, 22000: -0.646, 23000: -0.687,
        24000: -0.7224, 25000: -0.7526, 26000: -0.7772, 27000: -0.7962,
        28000: -0.81, 29000: -0.8182, 30000: -0.8208,
    },
    200.0: {
        0: 1.635, 1000: 1.4825, 2000: 1.3273, 3000: 1.1762,
        4000: 1.0306, 5000: 0.8911, 6000: 0.7567, 7000: 0.6277,
        8000: 0.5045, 9000: 0.3866, 10000: 0.2741, 11000: 0.1673,
        12000: 0.0, 13000: -0.0302, 14000: -0.1206, 15000: -0.2056,
        16000: -0.2852, 17000: -0.3591, 18000: -0.4276, 19000: -0.4908,
        20000: -0.5483, 21000: -0.6004, 22000: -0.647, 23000: -0.6881,
        24000: -0.7237, 25000: -0.754, 26000: -0.7786, 27000: -0.7977,
        28000: -0.8115, 29000: -0.8197, 30000: -0.8224,
    },
}
